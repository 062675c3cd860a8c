def owner(cursor):
    row = cursor.fetchone()
    if row is None:
        return None
    return row[0]
