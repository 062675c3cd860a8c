def header_key(key):
    key = clean(key)
    return key.title()
