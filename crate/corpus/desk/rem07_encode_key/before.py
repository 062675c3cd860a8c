def digest(key):
    key = key.encode('utf-8')
    return hashlib.md5(key)
