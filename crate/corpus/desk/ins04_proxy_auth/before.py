def proxy_auth(login, secret):
    raw = '%s:%s' % (unquote(login), unquote(secret))
    return encode(raw)
