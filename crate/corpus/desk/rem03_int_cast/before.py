def scale(factor, items):
    factor = int(factor)
    return [x * factor for x in items]
