def cookie_header(name, value):
    pair = '%s=%s' % (escape(name), escape(value))
    header = encode_header(pair)
    return header
