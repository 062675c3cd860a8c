def caption(label):
    label = str(label)
    return wrap_text(label)
