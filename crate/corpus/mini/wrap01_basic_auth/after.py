def basic_auth(user, password):
    if user:
        creds = to_bytes('%s:%s' % (quote(user), quote(password)))
        token = b64encode(creds).strip()
    return token
