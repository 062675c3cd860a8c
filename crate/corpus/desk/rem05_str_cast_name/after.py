def tag(name):
    return make_tag(name)
