def half(values):
    cut = len(values) // 2
    return values[:cut]
