def describe(user_id):
    label = 'user ' + str(user_id)
    return label
