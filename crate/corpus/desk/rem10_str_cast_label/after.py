def caption(label):
    return wrap_text(label)
