def middle(items):
    mid = len(items) / 2
    return items[mid]
