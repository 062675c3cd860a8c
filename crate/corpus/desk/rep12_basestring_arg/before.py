def check(arg):
    flag = isinstance(arg, basestring)
    return flag
