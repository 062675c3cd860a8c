def basic_auth(user, password):
    creds = to_bytes('%s:%s' % (quote(user), quote(password)))
    return b64encode(creds)
