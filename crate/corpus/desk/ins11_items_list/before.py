def first_pair(mapping):
    pairs = mapping.items()
    return pairs[0]
