def ordered(mapping):
    keys = mapping.keys()
    keys.sort()
    return keys
