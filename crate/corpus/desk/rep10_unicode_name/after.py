def title_of(book):
    title = str(book)
    return title
