def cookie_header(name, value):
    pair = to_native('%s=%s' % (escape(name), escape(value)))
    return encode_header(pair)
