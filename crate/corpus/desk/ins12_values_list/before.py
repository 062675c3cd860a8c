def last_value(mapping):
    values = mapping.values()
    return values[-1]
