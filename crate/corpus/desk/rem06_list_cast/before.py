def count(items):
    items = list(items)
    return tally(items)
