def label_of(item):
    label = str(item)
    return label
