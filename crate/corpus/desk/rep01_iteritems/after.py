def pairs(mapping):
    for key, value in mapping.items():
        emit(key, value)
