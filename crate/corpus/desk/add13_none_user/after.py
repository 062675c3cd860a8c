def email_of(users, uid):
    user = users.get(uid)
    if user is None:
        return None
    return user.email
