def lookup_key(table, key):
    found = table.has_key(key)
    return found
