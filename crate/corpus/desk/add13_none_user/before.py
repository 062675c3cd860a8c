def email_of(users, uid):
    user = users.get(uid)
    return user.email
