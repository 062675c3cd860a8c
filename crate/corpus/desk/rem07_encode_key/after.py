def digest(key):
    return hashlib.md5(key)
