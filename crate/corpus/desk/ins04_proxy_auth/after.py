def proxy_auth(login, secret):
    raw = to_bytes('%s:%s' % (unquote(login), unquote(secret)))
    return encode(raw)
