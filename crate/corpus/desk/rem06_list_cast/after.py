def count(items):
    return tally(items)
