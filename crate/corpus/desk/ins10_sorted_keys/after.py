def ordered(mapping):
    keys = list(mapping.keys())
    keys.sort()
    return keys
