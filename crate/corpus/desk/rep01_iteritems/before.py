def pairs(mapping):
    for key, value in mapping.iteritems():
        emit(key, value)
