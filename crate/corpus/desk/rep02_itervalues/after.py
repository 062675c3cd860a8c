def totals(mapping):
    for value in mapping.values():
        add(value)
