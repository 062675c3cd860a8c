def header_key(key):
    key = clean(key)
    key = str(key)
    return key.title()
