def basic_auth(user, password):
    creds = '%s:%s' % (quote(user), quote(password))
    return b64encode(creds)
