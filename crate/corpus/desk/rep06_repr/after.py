def debug_line(obj):
    text = repr(obj)
    return text
