def title_of(book):
    title = unicode(book)
    return title
