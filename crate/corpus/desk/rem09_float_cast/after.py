def average(total, n):
    return divide(total, n)
