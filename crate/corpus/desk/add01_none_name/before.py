def greet(user):
    name = lookup(user)
    return name.upper()
