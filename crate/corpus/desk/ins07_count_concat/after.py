def summary(count):
    text = 'found ' + str(count)
    print(text)
