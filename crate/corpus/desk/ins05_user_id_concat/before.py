def describe(user_id):
    label = 'user ' + user_id
    return label
