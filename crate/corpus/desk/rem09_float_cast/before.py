def average(total, n):
    total = float(total)
    return divide(total, n)
