def check(arg):
    flag = isinstance(arg, str)
    return flag
