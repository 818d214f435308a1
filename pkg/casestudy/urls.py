from django.urls import path

from .views import DeutschJozsaAPIView

urlpatterns = [
    path('dj/', DeutschJozsaAPIView.as_view()),
]
