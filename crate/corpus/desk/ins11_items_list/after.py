def first_pair(mapping):
    pairs = list(mapping.items())
    return pairs[0]
