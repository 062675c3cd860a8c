def tag(name):
    name = str(name)
    return make_tag(name)
