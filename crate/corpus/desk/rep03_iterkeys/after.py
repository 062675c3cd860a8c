def names(mapping):
    for key in mapping.keys():
        show(key)
