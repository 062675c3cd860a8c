def label_of(item):
    label = unicode(item)
    return label
