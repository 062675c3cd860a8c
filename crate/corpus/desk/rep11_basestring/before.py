def is_text(value):
    ok = isinstance(value, basestring)
    return ok
