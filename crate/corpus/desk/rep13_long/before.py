def big(n):
    value = long(n)
    return value
