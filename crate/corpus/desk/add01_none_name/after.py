def greet(user):
    name = lookup(user)
    if name is None:
        return None
    return name.upper()
