def lookup_key(table, key):
    found = key in table
    return found
