def names(mapping):
    for key in mapping.iterkeys():
        show(key)
