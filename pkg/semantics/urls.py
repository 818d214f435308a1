from django.urls import path

from .views import RunAPIView

urlpatterns = [
    path('run/', RunAPIView.as_view()),
]
