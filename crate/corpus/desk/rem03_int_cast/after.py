def scale(factor, items):
    return [x * factor for x in items]
