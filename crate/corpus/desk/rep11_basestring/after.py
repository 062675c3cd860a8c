def is_text(value):
    ok = isinstance(value, str)
    return ok
