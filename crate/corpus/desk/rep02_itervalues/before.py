def totals(mapping):
    for value in mapping.itervalues():
        add(value)
