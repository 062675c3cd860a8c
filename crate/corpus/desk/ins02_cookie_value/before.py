def cookie_header(name, value):
    pair = '%s=%s' % (escape(name), escape(value))
    return encode_header(pair)
