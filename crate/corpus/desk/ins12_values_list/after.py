def last_value(mapping):
    values = list(mapping.values())
    return values[-1]
