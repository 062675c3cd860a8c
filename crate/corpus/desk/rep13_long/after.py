def big(n):
    value = int(n)
    return value
