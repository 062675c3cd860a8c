def owner(cursor):
    row = cursor.fetchone()
    return row[0]
