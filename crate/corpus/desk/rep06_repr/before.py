def debug_line(obj):
    text = str(obj)
    return text
