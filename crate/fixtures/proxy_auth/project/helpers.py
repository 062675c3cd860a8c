def to_bytes(text, encoding='utf-8'):
    if isinstance(text, bytes):
        return text
    return text.encode(encoding)
